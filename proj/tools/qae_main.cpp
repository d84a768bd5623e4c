#include "qae/cli.hpp"

int main(int argc, char** argv) { return qae::cli::run(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return secrelay::cli::run(argc, argv); }

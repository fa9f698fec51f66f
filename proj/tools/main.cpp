#include "cli.hpp"

int main(int argc, char** argv) { return nflab::cli::run(argc, argv); }

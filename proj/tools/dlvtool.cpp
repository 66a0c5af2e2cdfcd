#include "dlv/cli.hpp"

int main(int argc, char** argv) { return dlv::cli::run(argc, argv); }

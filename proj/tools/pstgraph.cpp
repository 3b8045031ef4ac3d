#include "pst/cli.hpp"

int main(int argc, char** argv) { return pst::cli::run(argc, argv); }

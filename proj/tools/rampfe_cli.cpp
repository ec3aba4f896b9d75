#include <rampfe/cli.hpp>

int main(int argc, char** argv) { return rampfe::cli::main(argc, argv); }

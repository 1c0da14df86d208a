#include "initrack/cli.hpp"

int main(int argc, char** argv) { return initrack::cli::run(argc, argv); }

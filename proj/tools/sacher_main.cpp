#include "sacher/cli.hpp"

int main(int argc, char** argv) { return sacher::cli::run(argc, argv); }

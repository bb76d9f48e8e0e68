#include "eavtr/cli.hpp"

int main(int argc, char** argv) { return eavtr::cli::dispatch(argc, argv); }

#include "delphinet/cli.hpp"

int main(int argc, char** argv) { return delphinet::cli::run(argc, argv); }

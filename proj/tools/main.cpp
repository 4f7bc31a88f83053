#include "shadowgpe/harness.hpp"

int main(int argc, char** argv) { return shadowgpe::run_cli(argc, argv); }

#include "app.hpp"

int main(int argc, char** argv) { return qcrb::app::run_cli(argc, argv); }

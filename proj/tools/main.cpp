#include "tde_app.hpp"

int main(int argc, char** argv) { return tde::app::run(argc, argv); }

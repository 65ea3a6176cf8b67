// Single translation unit carrying the Catch2 amalgamated implementation.
#include <catch2/catch_amalgamated.cpp>

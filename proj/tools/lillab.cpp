#include <cstdio>

int main() { return 0; }  // placeholder; real CLI lands with the cli module

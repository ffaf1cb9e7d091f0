#include <cstdio>

int main() {
  std::puts("sectar: command line under construction");
  return 1;
}

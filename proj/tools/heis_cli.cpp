#include <cstdio>

int main(int, char**) {
  std::fprintf(stderr, "cli: not wired yet\n");
  return 1;
}

// inputs: -2000000000..2000000000 0..31
int popcount(unsigned int v) {
  int c = 0;
  while (v) { v &= v - 1u; c++; }
  return c;
}
unsigned int rotl(unsigned int v, int s) { return (v << s) | (v >> ((32 - s) & 31)); }
int main(int x, int s) {
  unsigned int u = (unsigned int)x;
  emit(popcount(u));
  emit(rotl(u, s));
  emit(x >> s);
  emit(u >> s);
  emit(x << (s & 15));
  emit((x ^ (x >> 31)) - (x >> 31));
  return popcount(u ^ rotl(u, 1));
}

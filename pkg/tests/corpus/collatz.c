// inputs: 1..200 0..3
int main(int n, int extra) {
  unsigned int x = n;
  int steps = 0;
  while (x != 1u && steps < 60) {
    if (x & 1u) x = 3u * x + 1u; else x = x >> 1;
    steps++;
  }
  emit(steps);
  emit(x);
  return steps + extra;
}

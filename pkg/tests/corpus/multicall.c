// inputs: -500..500 -500..500
int clamp(int v, int lo, int hi) {
  if (v < lo) return lo;
  if (v > hi) return hi;
  return v;
}
int sq(int v) { return v * v; }
void note(int v) { emit(v); }
int main(int a, int b) {
  int x = clamp(a, -100, 100);
  int y = clamp(b, x, 200);
  note(x);
  note(y);
  int z = sq(x) + sq(y) - sq(clamp(a + b, 0, 10));
  note(z);
  return clamp(z, -1000, 1000) + sq(3);
}

// inputs: 1..7 -50..50
int next[8];
int val[8];
int main(int stride, int base) {
  for (int i = 0; i < 8; i++) {
    next[i] = (i + stride) % 8;
    val[i] = base + i * i;
  }
  int p = 0;
  int s = 0;
  for (int step = 0; step < 10; step++) {
    s += val[p];
    val[p] = val[p] - 1;
    p = next[p];
  }
  emit(s);
  emit(p);
  emit(val[0]);
  return val[p];
}

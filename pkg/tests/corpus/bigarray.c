// inputs: -1000..1000 0..99
int big[100];
int main(int v, int k) {
  big[k] = v;
  big[(k + 50) % 100] = v * 2;
  big[99 - k] += 1;
  int s = 0;
  for (int i = 0; i < 100; i += 11) s += big[i];
  emit(s);
  emit(big[k]);
  emit(big[99 - k]);
  return big[(k + 50) % 100];
}

// inputs: 0..25 1..6
int main(int n, int m) {
  int s = 0;
  for (int i = 0; i < n; i++) {
    if (i % m == 0) continue;
    if (i > 20) break;
    s += i;
  }
  emit(s);
  int k = n;
  do { k -= m; s++; } while (k > 0);
  emit(k);
  emit(s);
  int j = 0;
  while (1) {
    j++;
    if (j * j > n) break;
  }
  emit(j);
  int t = 0;
  for (int a = 0; a < 4; a++)
    for (int b = 0; b < 4; b++) {
      if (b == a) continue;
      t += a * b;
    }
  emit(t);
  int d = 0;
  do {
    d++;
    if (d == 2) continue;
    t--;
  } while (d < m);
  emit(t);
  return s + j;
}

// inputs: -30..30 1..5
int counter = 5;
long long total = 0;
float scale = 2.5f;
int hist[4];
void add(int v) {
  counter++;
  total += v;
  hist[v & 3] = hist[v & 3] + 1;
}
int get(void) { return counter; }
int main(int a, int n) {
  for (int i = 0; i < n; i++) add(a + i);
  emit(counter);
  emit(total);
  emit(get());
  scale = scale * (float)a;
  emit(scale);
  emit(hist[0] + 2 * hist[1] + 3 * hist[2] + 4 * hist[3]);
  return get() + (int)total;
}

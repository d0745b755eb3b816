// inputs: -40..40 0..9
int g;
int main(int a, int b) {
  int count = 0;
  int bump(int d) { count = count + d; g = g + 1; return count * 2; }
  int twice(int x) { return bump(x) + bump(x); }
  emit(bump(a));
  emit(twice(b));
  int arr[3] = {5, 6, 7};
  void put(int i, int v) { arr[i] = v + count; }
  put(1, a);
  put(b % 3, b);
  emit(arr[0] + arr[1] + arr[2]);
  for (int i = 0; i < 3; i++) bump(i);
  emit(count);
  return g;
}

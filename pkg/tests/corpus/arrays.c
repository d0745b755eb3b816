// inputs: -50..50 0..7
int data[8];
int main(int seed, int k) {
  int i;
  for (i = 0; i < 8; i++) data[i] = (seed * (i + 3)) % 17 - i;
  for (i = 0; i < 7; i++) {
    for (int j = 0; j < 7 - i; j++) {
      if (data[j] > data[j + 1]) {
        int t = data[j];
        data[j] = data[j + 1];
        data[j + 1] = t;
      }
    }
  }
  int sum = 0;
  for (i = 0; i < 8; i++) { sum += data[i]; emit(data[i]); }
  emit(data[k]);
  int local[5] = {1, 2, 3};
  local[4] = data[k];
  emit(local[0] + local[2] + local[3] + local[4]);
  return sum;
}

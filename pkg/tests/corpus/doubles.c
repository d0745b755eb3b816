// inputs: -1000.0..1000.0 0.1..50.0
double main(double x, double y) {
  double a = x * y + 0.125;
  emit(a);
  emit(x / y);
  emit(x - y * 3.0);
  emit(a > 100.0);
  emit(x == x);
  emit((long long)(x * 1000000.0));
  emit((float)(x / 3.0));
  double term = 1.0, sum = 0.0;
  for (int n = 1; n < 8; n++) { term = term * y / n; sum += term; }
  emit(sum);
  return -x;
}

// inputs: -1000..1000 1..60
int main(int a, int b) {
  int q = a / b;
  int r = a % b;
  emit(q);
  emit(r);
  emit(q * b + r == a);
  emit(a * b - (a - b) * 7);
  emit(-a / 3);
  emit((a + 13) % -7);
  emit(a * 2147483 + b);
  int t = a;
  t += b; t -= 3; t *= -2; t /= 5; t %= 11;
  emit(t);
  return a - b;
}

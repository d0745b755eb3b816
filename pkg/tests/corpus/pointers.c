// inputs: -100..100 1..6
int buf[6];
int total(restrict buf int *p, int n) {
  int s = 0;
  while (n > 0) { s += *p; p++; n--; }
  return s;
}
int main(int x, int n) {
  restrict buf int *p = buf;
  restrict buf int *q;
  for (int i = 0; i < 6; i++) { *p = x + i * i; p = p + 1; }
  q = &buf[2];
  *q = -x;
  q[1] = q[0] * 2;
  p = buf;
  emit(p[n - 1]);
  emit(*(p + 3));
  emit(q - p);
  emit(&buf[5] - q);
  emit(p < q);
  p += 4;
  emit(*p);
  emit(total(buf, n));
  return total(&buf[1], 5 - (n % 5));
}

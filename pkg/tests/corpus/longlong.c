// inputs: -3000000000..3000000000 1..100000
long long main(long long a, long long b) {
  long long p = a * b;
  emit(p);
  emit(a / b);
  emit(a % b);
  emit(p >> 7);
  emit(a << 20);
  emit(a < b);
  emit(a != p);
  unsigned long long u = (unsigned long long)a;
  emit(u / 7ull);
  emit(u % 1000ull);
  emit(u >> 40);
  emit(~u & 0xffffffff0000ull);
  emit(-a + (a ^ b) - (a | 3) + (a & b));
  unsigned long long big = 18446744073709551615ull;
  emit(big / (unsigned long long)b);
  emit(u > big - 5ull);
  return a - 9000000000ll;
}

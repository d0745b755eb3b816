// inputs: 0..10 1..200
int calls;
int fib(int n) { calls++; if (n < 2) return n; return fib(n - 1) + fib(n - 2); }
int gcd(int a, int b) { if (b == 0) return a; return gcd(b, a % b); }
int is_even(int n);
int is_odd(int n) { if (n == 0) return 0; return is_even(n - 1); }
int is_even(int n) { if (n == 0) return 1; return is_odd(n - 1); }
long long power(long long base, int e) {
  if (e == 0) return 1;
  long long half = power(base, e / 2);
  if (e % 2) return half * half * base;
  return half * half;
}
int main(int n, int m) {
  emit(fib(n));
  emit(calls);
  emit(gcd(m, 84));
  emit(is_even(n));
  emit(is_odd(m % 20));
  emit(power(3, n + 20));
  return fib(n % 6) + gcd(n + 1, m);
}

// inputs: -10..10 -10..10
int hits;
int side(int v) { hits++; return v; }
int main(int a, int b) {
  emit(a && b);
  emit(a || b);
  emit(!a);
  emit(a < b && b < 5);
  emit(a > 0 || side(b) > 0);
  emit(a != 0 && side(a) > 3);
  emit(hits);
  int m = a > b ? a : b;
  emit(m);
  emit(a == b ? 100 : a < b ? -1 : 1);
  int c = (a > 2) + (b <= -3) * 2;
  emit(c);
  emit(!(a >= b) == (a < b));
  return (a & 1) ? side(a) : -side(b);
}

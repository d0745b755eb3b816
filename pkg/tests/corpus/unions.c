// inputs: -100000..100000 -50.0..50.0
union word { int i; unsigned int u; float f; char c[4]; short h[2]; };
union wide { long long ll; double d; int half[2]; };
int main(int v, float f) {
  union word w;
  w.i = v;
  emit(w.u);
  emit(w.c[0]);
  emit(w.c[3]);
  emit(w.h[1]);
  w.f = f;
  emit(w.i);
  emit(w.u >> 23);
  w.c[1] = 7;
  emit(w.i);
  union wide x;
  x.d = (double)f;
  emit(x.ll);
  emit(x.half[0]);
  x.half[1] = v;
  emit(x.ll);
  return w.c[0] + w.c[1];
}

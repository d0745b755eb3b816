// inputs: -100.0..100.0 0.5..20.0
float main(float x, float y) {
  float s = x + y;
  float d = x - y;
  float p = x * y;
  float q = x / y;
  emit(s); emit(d); emit(p); emit(q);
  emit(x < y);
  emit(x >= -y);
  emit((int)q);
  emit((unsigned int)(y * 1000.0f));
  float acc = 0.0f;
  int i = 0;
  while (i < 5) { acc = acc * 0.5f + x; i++; }
  emit(acc);
  emit(-x);
  return x * 0.25f + 1.0f / y;
}

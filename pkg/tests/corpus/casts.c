// inputs: -70000..70000 -300.0..300.0
int main(int i, double d) {
  _Bool b = i;
  char c = (char)i;
  unsigned char uc = (unsigned char)i;
  short s = (short)i;
  unsigned short us = (unsigned short)i;
  unsigned int ui = (unsigned int)i;
  long l = i;
  unsigned long ul = (unsigned long)i;
  long long ll = i;
  unsigned long long ull = (unsigned long long)i;
  float f = (float)d;
  emit(b); emit(c); emit(uc); emit(s); emit(us);
  emit(ui); emit(l); emit(ul); emit(ll); emit(ull);
  emit(f);
  emit((char)d);
  emit((unsigned char)d);
  emit((short)d);
  emit((int)d);
  emit((long long)d);
  emit((unsigned short)(d * 100.0));
  emit((double)c + (double)uc);
  emit((float)ull);
  emit((double)ll);
  emit((_Bool)d);
  emit((int)(short)(char)i);
  emit((unsigned char)s + (unsigned short)c);
  emit((long long)ui);
  emit((int)ll);
  emit((unsigned int)(unsigned char)(ull >> 3));
  return c + s;
}

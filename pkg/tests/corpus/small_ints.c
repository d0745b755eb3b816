// inputs: -200..200 0..300
int main(int x, int y) {
  char c = x;
  unsigned char uc = y;
  short s = x * 300;
  unsigned short us = y * 250;
  _Bool flag = x > 0;
  c += 100;
  uc *= 3;
  s = s * 7;
  us = us + 65000;
  emit(c); emit(uc); emit(s); emit(us);
  flag++;
  emit(flag);
  flag--;
  emit(flag);
  flag--;
  emit(flag);
  _Bool z = y;
  emit(z + flag);
  char big = 127;
  big++;
  emit(big);
  unsigned char u0 = 0;
  u0--;
  emit(u0);
  emit(c * uc);
  emit(-us);
  emit(~c);
  return s / 3;
}

// inputs: 0..5 -20..20
int out[6];
int walk(int d, int v) {
  int tmp[3];
  tmp[0] = v; tmp[1] = v + d; tmp[2] = v * 2;
  if (d > 0) {
    int r = walk(d - 1, tmp[1]);
    out[d] = r + tmp[0];
  }
  return tmp[0] + tmp[1] + tmp[2];
}
int main(int d, int v) {
  emit(walk(d, v));
  int s = 0;
  for (int i = 0; i < 6; i++) s += out[i];
  return s;
}

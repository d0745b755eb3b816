// inputs: 0..30 1..9
int main(int n, int step) {
  int acc = 0;
  int i = 0;
  int k = 3;
  {
    __label__ top, done;
  top:
    if (i >= n) goto done;
    acc = acc + i * step;
    i = i + step;
    goto top;
  done:
    emit(acc);
  }
  {
    __label__ again;
  again:
    acc = acc - k;
    k--;
    if (k > 0) goto again;
  }
  emit(acc);
  return i;
}

// inputs: 0..4000000000 1..40
unsigned int main(unsigned int a, unsigned int b) {
  emit(a / b);
  emit(a % b);
  emit(a - 4000000000u);
  emit(a * 2654435761u);
  emit(a >> (b % 32));
  emit(a << 3);
  emit(~a ^ b);
  emit(a & 0xff00ff00u | b);
  unsigned int h = 2166136261u;
  for (unsigned int i = 0; i < 4; i++) {
    h = (h ^ ((a >> (i * 8)) & 255u)) * 16777619u;
  }
  emit(h);
  return a > b;
}

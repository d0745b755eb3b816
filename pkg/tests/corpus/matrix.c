// inputs: -9..9 -9..9
int A[3][3];
int B[3][3];
int C[3][3];
int main(int a, int b) {
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++) {
      A[i][j] = a + i - j;
      B[i][j] = b * (i + 1) - j;
    }
  for (int i = 0; i < 3; i++)
    for (int j = 0; j < 3; j++) {
      int s = 0;
      for (int k = 0; k < 3; k++) s += A[i][k] * B[k][j];
      C[i][j] = s;
    }
  emit(C[0][0]); emit(C[1][2]); emit(C[2][1]);
  return C[2][2] - C[0][1];
}

// inputs: -20..20 0..3
struct pt { int x; int y; float w; };
struct pt pts[4];
struct box { struct pt lo; struct pt hi; };
int main(int a, int k) {
  for (int i = 0; i < 4; i++) {
    pts[i].x = a + i;
    pts[i].y = a * i;
    pts[i].w = (float)i * 0.5f;
  }
  pts[k].y = pts[k].y + 100;
  struct box b;
  b.lo.x = pts[0].x; b.lo.y = pts[1].y;
  b.hi.x = pts[3].x; b.hi.y = pts[k].y;
  b.lo.w = 1.5f; b.hi.w = pts[2].w;
  emit(b.hi.x - b.lo.x);
  emit(b.hi.y);
  emit(b.lo.w + b.hi.w);
  restrict pts struct pt *pp = &pts[k];
  pp->x = pp->x * 3;
  emit(pts[k].x);
  emit(pp->w);
  int s = 0;
  for (int i = 0; i < 4; i++) s += pts[i].x + pts[i].y;
  return s;
}

static int counter;
const char *greeting = "fixture greeting string";
static int helper(int x) { return x * 3 + counter; }
int alpha(int x) { counter += x; return helper(x) + 1; }
int beta(int y) { return alpha(y) * 2 - 7; }

public class Calc {
    static final int FACTOR = 7;

    public static int scale(int a) {
        int result = a * FACTOR;
        return result;
    }

    public static int clamp(int v, int lo, int hi) {
        if (v < lo) {
            return lo;
        }
        if (v > hi) {
            return hi;
        }
        return v;
    }

    public static int sumUpTo(int n) {
        int total = 0;
        for (int i = 1; i <= n; i++) {
            total += i;
        }
        return total;
    }

    public static String describe(int v) {
        if (v % 2 == 0) {
            return "even:" + v;
        } else {
            return "odd:" + v;
        }
    }

    public static int firstPositive(int[] xs) {
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] > 0) {
                return xs[i];
            }
        }
        return -1;
    }

    public static int uniqueCount() {
        Set<String> names = new HashSet<String>();
        names.add("a");
        names.add("a");
        return names.size();
    }
}

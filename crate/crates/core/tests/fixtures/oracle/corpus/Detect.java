public class Detect {
    static int arraySum(int[] a, int n) {
        int s = 0;
        for (int i = 0; i < n; i++) {
            s += a[i];
        }
        return s;
    }

    static int whileSum(int[] a, int n) {
        int s = 0;
        int i = 0;
        while (i < n) {
            s += a[i];
            i++;
        }
        return s;
    }

    static double root() {
        double r = Math.sqrt(5);
        return r;
    }
}

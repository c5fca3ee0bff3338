public class Guarded {
    static int positives(int[] a, int n) {
        int s = 0;
<SimpleNestedLoop sp="true">
        for (int i = 0; i < n; i++) {
            if (a[i] > 0) s += a[i];
        }
</SimpleNestedLoop>
        return s;
    }

    static double weights(double[] ws) {
        double t = 0.0;
<SimpleNestedLoop sp="true">
        for (double w : ws) {
            t += w;
        }
</SimpleNestedLoop>
        return t;
    }
}

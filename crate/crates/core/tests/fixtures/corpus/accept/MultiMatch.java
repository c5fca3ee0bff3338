public class MultiMatch {
    static int twice(int[] a, int n) {
        int first = 0;
        for (int i = 0; i < n; i++) {
            first = first + a[i];
        }
        int second = 0;
        for (int k = 1; k <= n; k++) {
            second += k * k;
        }
        return first + second;
    }
}

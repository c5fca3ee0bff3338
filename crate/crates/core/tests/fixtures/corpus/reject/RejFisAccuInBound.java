public class RejFisAccuInBound {
    static int grow(int[] a, int n) {
        int s = 0;
        for (int i = 0; i < s + n; i++) {
            s += a[i];
        }
        return s;
    }
}

public class NfissMatrix {
    static long sum(int[][] m, int rows, int cols) {
        long acc = 0;
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                acc += m[i][j];
            }
        }
        return acc;
    }
}

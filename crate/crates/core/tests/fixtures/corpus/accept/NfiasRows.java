public class NfiasRows {
    static void rowSums(double[] acc, double[][] m, int rows, int cols) {
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                acc[i] += m[i][j];
            }
        }
    }
}

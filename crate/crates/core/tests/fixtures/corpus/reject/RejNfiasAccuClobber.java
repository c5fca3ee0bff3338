public class RejNfiasAccuClobber {
    static void rows(double[] acc, double[][] m, int rows, int cols) {
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                acc[i] += m[i][j];
            }
            acc[0] = 0.0;
        }
    }
}

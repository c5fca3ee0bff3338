public class Precedence { private int sum; private int unused;
    void total(int[][] m, int rows, int cols) {
        for (int i = 0; i < rows; i++) {
            unused = 0;
            for (int j = 0; j < cols; j++) {
                sum += m[i][j];
            }
            unused++;
        }
    }
}

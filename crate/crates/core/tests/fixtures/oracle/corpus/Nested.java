public class Nested {
    static int total(int[][] m, int rows, int cols) {
        int acc = 0;
        for (int i = 0; i < rows; i++) {
            for (int j = 0; j < cols; j++) {
                acc += m[i][j];
            }
        }
        return acc;
    }
}

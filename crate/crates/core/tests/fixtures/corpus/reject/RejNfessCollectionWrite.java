public class RejNfessCollectionWrite {
    static int consume(int[][] grid) {
        int s = 0;
        for (int[] row : grid) {
            for (int v : row) {
                s += v;
            }
            grid = null;
        }
        return s;
    }
}

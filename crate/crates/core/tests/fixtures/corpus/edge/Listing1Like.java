public class Listing1Like {
    private float latest;
    private float total;
    private int count;
    private float average;

    public void put(float value) {
        latest = value;
        total += value;
        count++;
        average = total / count;
    }
}

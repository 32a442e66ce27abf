class Solution:
    def repairCars(self, ranks, cars):
        n = len(ranks)
        best = None

        def assign(i, left, worst):
            nonlocal best
            if i == n - 1:
                t = max(worst, ranks[i] * left * left)
                if best is None or t < best:
                    best = t
                return
            for k in range(left + 1):
                assign(i + 1, left - k, max(worst, ranks[i] * k * k))

        assign(0, cars, 0)
        return best

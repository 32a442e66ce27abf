class Solution:
    def repairCars(self, ranks, cars):
        # hand every car to the fastest mechanic
        return min(ranks) * cars * cars

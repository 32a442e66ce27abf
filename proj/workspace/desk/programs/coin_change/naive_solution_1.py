class Solution:
    def coinChange(self, coins, amount):
        big = max(coins)
        return amount // big if amount % big == 0 else -1

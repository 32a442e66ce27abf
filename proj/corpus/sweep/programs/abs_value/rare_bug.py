x = abs(int(input()))
# Off by one whenever the last digit is 7: 20 of the 199 legal inputs.
print(x + 1 if x % 10 == 7 else x)

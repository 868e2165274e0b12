import sys
from multiprocessing import set_start_method
from sys import platform

from pilnet import cli

def main():
	# Be sure trial workers are forked, not spawned
	if platform == "linux" or platform == "linux2" or platform == "darwin":
		set_start_method("fork")

	sys.exit(cli.run(sys.argv[1:]))

if __name__ == "__main__":
	main()
